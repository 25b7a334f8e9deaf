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


#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "json.hpp"
#include "temp_dir.h"
#include "tokpipe/binarize.h"
#include "tokpipe/bpe.h"

namespace tokpipe::cli {
namespace {

using nlohmann::json;
using testing::TempDir;
using testing::write_file;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run(args, in, out, err);
  return {code, out.str(), err.str()};
}

// A corpus, a trained vocabulary and its binarization.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = dir_.file("corpus.txt");
    std::string text;
    for (int i = 0; i < 50; ++i) text += "Hallo Welt, die Straße ist lang " + std::to_string(i) + "\n";
    write_file(corpus_, text);
    vocab_ = dir_.file("vocab");
    ASSERT_EQ(call({"train-bpe", corpus_, "--vocab-size", "300", "--out", vocab_}).code, 0);
  }

  TempDir dir_;
  std::string corpus_;
  std::string vocab_;
};

TEST(Cli, NoArgumentsIsUsageError) {
  const auto r = call({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndBadFlag) {
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"lr-curve", "--nope"}).code, 2);
  EXPECT_EQ(call({"lr-curve", "--warmup", "ten"}).code, 2);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(call({"--help"}).code, 0);
  const auto v = call({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, OperationalFailureExitsOne) {
  const auto r = call({"stats", "/nonexistent/file.txt"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/nonexistent/file.txt"), std::string::npos);
}

TEST(Cli, LrCurveJson) {
  const auto r = call({"--json", "lr-curve", "--warmup", "10000", "--total", "100000", "--peak", "4e-4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  ASSERT_TRUE(doc.is_array());
  bool found = false;
  for (const auto& p : doc) {
    if (p["step"] == 10000) {
      EXPECT_EQ(p["lr"].get<double>(), 0.0004);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, LrCurveCsv) {
  const auto r = call({"lr-curve", "--warmup", "10000", "--total", "100000", "--peak", "4e-4",
                       "--power", "1", "--stride", "5000"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 8), "step,lr\n");
  EXPECT_NE(r.out.find("\n5000,0.0002\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n10000,0.0004\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n55000,0.0002\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n100000,0\n"), std::string::npos);
}

TEST(Cli, CompareSize) {
  TempDir dir;
  const auto vocab = bpe::Vocabulary::from_merges({});
  MemoryDocumentStream a({std::string(59, 'a')});  // 60 ids with the separator
  MemoryDocumentStream b({std::string(99, 'a')});
  binarize(a, vocab, dir.file("a.bin"));
  binarize(b, vocab, dir.file("b.bin"));
  const auto r = call({"compare-size", dir.file("a.bin"), dir.file("b.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ratio 0.6000, reduction 40.00%"), std::string::npos) << r.out;
  const auto j = call({"--json", "compare-size", dir.file("a.bin"), dir.file("b.bin")});
  EXPECT_DOUBLE_EQ(json::parse(j.out)["reduction"].get<double>(), 0.4);
}

TEST_F(CliTest, StatsHumanAndJson) {
  const auto r = call({"--json", "stats", corpus_});
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["documents"], 50);
  EXPECT_EQ(doc["words"], 350);
  EXPECT_NE(call({"stats", corpus_}).out.find("documents 50"), std::string::npos);
}

TEST_F(CliTest, SampleIsReproducible) {
  const auto a = dir_.file("a.txt"), b = dir_.file("b.txt");
  ASSERT_EQ(call({"sample", corpus_, "--bytes", "300", "--seed", "7", "--out", a}).code, 0);
  ASSERT_EQ(call({"sample", corpus_, "--bytes", "300", "--seed", "7", "--out", b}).code, 0);
  EXPECT_EQ(testing::read_file(a), testing::read_file(b));
  EXPECT_GE(testing::read_file(a).size(), 300u);
}

TEST_F(CliTest, SplitFromStdin) {
  std::string input;
  for (int i = 0; i < 10; ++i) input += "item" + std::to_string(i) + "\n";
  const auto r = call({"--json", "split", "--fraction", "0.9", "--seed", "42"}, input);
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["train"].size(), 9u);
  EXPECT_EQ(doc["validation"].size(), 1u);
  EXPECT_EQ(r.out, call({"--json", "split", "--fraction", "0.9", "--seed", "42"}, input).out);

  const auto train = dir_.file("train.txt"), valid = dir_.file("valid.txt");
  write_file(dir_.file("items.txt"), input);
  ASSERT_EQ(call({"split", dir_.file("items.txt"), "--train-out", train, "--valid-out", valid}).code, 0);
  EXPECT_EQ(testing::read_file(valid).size() + testing::read_file(train).size(), input.size());
}

TEST_F(CliTest, EncodeDecodeRoundTrip) {
  const std::string text = "Hallo Welt\nGrüße aus der Straße\n\n";
  const auto ids = call({"encode", vocab_, "--ids"}, text);
  ASSERT_EQ(ids.code, 0) << ids.err;
  const auto back = call({"decode", vocab_}, ids.out);
  ASSERT_EQ(back.code, 0) << back.err;
  EXPECT_EQ(back.out, text);

  const auto vocab = bpe::load_vocab(vocab_);
  const auto expected = bpe::encode(vocab, "Hallo Welt");
  std::string first_line = ids.out.substr(0, ids.out.find('\n'));
  std::string want;
  for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? " " : "") + std::to_string(expected[i]);
  EXPECT_EQ(first_line, want);

  const auto tokens = call({"encode", vocab_, "--tokens"}, "Hallo Welt\n");
  EXPECT_NE(tokens.out.find("Ġ"), std::string::npos);
  EXPECT_EQ(call({"encode", vocab_, "--tokens", "--ids"}).code, 2);
}

TEST_F(CliTest, DecodeRejectsBadIds) {
  const auto r = call({"decode", vocab_}, "1 2 999999\n");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("999999"), std::string::npos);
  EXPECT_EQ(call({"decode", vocab_}, "1 x\n").code, 1);
}

TEST_F(CliTest, BinarizeFertilityAndExamples) {
  const auto bin = dir_.file("d.bin");
  const auto r = call({"--json", "binarize", corpus_, "--vocab", vocab_, "--out", bin});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["documents"], 50);
  EXPECT_EQ(doc["tokens"].get<std::uint64_t>(), read_dataset(bin).size());

  EXPECT_EQ(call({"fertility", corpus_, "--vocab", vocab_}).code, 0);

  const auto ex1 = dir_.file("e1.bin"), ex2 = dir_.file("e2.bin");
  ASSERT_EQ(call({"make-examples", bin, "--vocab", vocab_, "--seq-len", "16", "--seed", "3", "--out", ex1}).code, 0);
  ASSERT_EQ(call({"make-examples", bin, "--vocab", vocab_, "--seq-len", "16", "--seed", "3", "--out", ex2}).code, 0);
  EXPECT_EQ(testing::read_file(ex1), testing::read_file(ex2));
  const auto streamed = call({"make-examples", bin, "--vocab", vocab_, "--seq-len", "16", "--seed", "3"});
  EXPECT_EQ(streamed.out, testing::read_file(ex1));
}

TEST_F(CliTest, EvalCommands) {
  const auto gold = dir_.file("gold.conll"), pred = dir_.file("pred.conll");
  write_file(gold, "Angela B-PER\nMerkel I-PER\nin O\nBerlin B-LOC\n\n");
  write_file(pred, "Angela B-PER\nMerkel I-PER\nin O\nBerlin O\n\n");
  const auto ner = call({"eval-ner", "--gold", gold, "--pred", pred});
  ASSERT_EQ(ner.code, 0) << ner.err;
  EXPECT_NE(ner.out.find("precision 1.0000  recall 0.5000  f1 0.6667  tp 1 fp 0 fn 1"),
            std::string::npos)
      << ner.out;

  const auto gg = dir_.file("gold.tsv"), gp = dir_.file("pred.tsv");
  write_file(gg, "1\tMann\tB-PER\tO\n\n");
  write_file(gp, "1\tMann\tB-PER\tB-LOC\n\n");
  const auto ge = call({"--json", "eval-ner", "--germeval", "--gold", gg, "--pred", gp});
  ASSERT_EQ(ge.code, 0) << ge.err;
  const json g = json::parse(ge.out);
  EXPECT_EQ(g["pooled"]["tp"], 1);
  EXPECT_EQ(g["pooled"]["fp"], 1);

  write_file(dir_.file("g.txt"), "A\nA\nB\n");
  write_file(dir_.file("p.txt"), "A\nB\nB\n");
  const auto clf = call({"eval-clf", "--gold", dir_.file("g.txt"), "--pred", dir_.file("p.txt"),
                         "--classes", "A,B"});
  ASSERT_EQ(clf.code, 0) << clf.err;
  EXPECT_NE(clf.out.find("mean f1 0.6667"), std::string::npos);

  write_file(dir_.file("runs.csv"), "run_id,val,test\n0,0.80,0.75\n1,0.90,0.70\n");
  const auto sel = call({"--json", "select-run", dir_.file("runs.csv")});
  ASSERT_EQ(sel.code, 0) << sel.err;
  EXPECT_EQ(json::parse(sel.out)["test"].get<double>(), 0.70);
}

TEST_F(CliTest, EverySubcommandEmitsOneJsonDocument) {
  const auto bin = dir_.file("d.bin");
  ASSERT_EQ(call({"binarize", corpus_, "--vocab", vocab_, "--out", bin}).code, 0);
  write_file(dir_.file("runs.csv"), "0,0.8,0.7\n");
  write_file(dir_.file("g.conll"), "a B-PER\n");
  write_file(dir_.file("l.txt"), "A\n");
  const std::vector<std::vector<std::string>> commands = {
      {"stats", corpus_},
      {"sample", corpus_, "--bytes", "100", "--out", dir_.file("s.txt")},
      {"split", corpus_},
      {"train-bpe", corpus_, "--vocab-size", "270", "--out", dir_.file("v2")},
      {"encode", vocab_},
      {"decode", vocab_},
      {"binarize", corpus_, "--vocab", vocab_, "--out", dir_.file("d2.bin")},
      {"compare-size", bin, bin},
      {"fertility", corpus_, "--vocab", vocab_},
      {"lr-curve"},
      {"budget"},
      {"make-examples", bin, "--vocab", vocab_, "--out", dir_.file("x.bin")},
      {"eval-ner", "--gold", dir_.file("g.conll"), "--pred", dir_.file("g.conll")},
      {"eval-clf", "--gold", dir_.file("l.txt"), "--pred", dir_.file("l.txt"), "--classes", "A"},
      {"select-run", dir_.file("runs.csv")},
  };
  for (auto args : commands) {
    args.insert(args.begin(), "--json");
    const auto r = call(args, "104 105\n1 2 3\n");
    ASSERT_EQ(r.code, 0) << args[1] << ": " << r.err;
    EXPECT_TRUE(json::accept(r.out)) << args[1];
  }
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  const auto cfg = dir_.file("p.ini");
  write_file(cfg, "[lr-curve]\nwarmup=10\ntotal=100\npeak=1.0\nstride=10\n");
  const auto r = call({"--json", "--config", cfg, "lr-curve"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)[1]["lr"].get<double>(), 1.0);
  const auto o = call({"--json", "--config", cfg, "lr-curve", "--peak", "2.0"});
  EXPECT_EQ(json::parse(o.out)[1]["lr"].get<double>(), 2.0);
}

TEST(Cli, ShippedPresetsParse) {
  const std::string root = TOKPIPE_SOURCE_DIR "/presets/";
  for (const char* name : {"conll2003", "germeval2014", "germeval2018_coarse", "germeval2018_fine",
                           "gnad10k", "pretrain"}) {
    const auto r = call({"--json", "--config", root + name + ".ini", "lr-curve"});
    EXPECT_EQ(r.code, 0) << name << ": " << r.err;
  }
}

}  // namespace
}  // namespace tokpipe::cli
