// Copyright 2026 The aratok Authors
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

#ifndef ARATOK_CLI_HPP_
#define ARATOK_CLI_HPP_

// The `aratok` command line. dispatch() is the whole program; main() only
// forwards argv and the standard streams.

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aratok/codec.hpp"
#include "aratok/corpus.hpp"
#include "aratok/errors.hpp"
#include "aratok/experiment.hpp"
#include "aratok/lep.hpp"
#include "aratok/metrics.hpp"
#include "aratok/model.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/trainer.hpp"
#include "aratok/vocab.hpp"

namespace aratok::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace detail {

// Normalization flags shared by normalize, ingest and train.
struct NormFlags {
  std::string config_path;
  std::string alif;
  bool drop = false;
  bool keep = false;
  bool no_numerals = false;
  bool no_punctuation = false;
  bool keep_tatweel = false;
  bool no_nfkc = false;
  bool raw = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "normalization config file (key = value)");
    app->add_option("--alif", alif, "alif mode: unify or preserve4");
    auto* d = app->add_flag("--drop-diacritics", drop, "remove harakat");
    auto* k = app->add_flag("--keep-diacritics", keep, "keep harakat");
    d->excludes(k);
    app->add_flag("--no-numerals", no_numerals, "keep Arabic-Indic digits");
    app->add_flag("--no-punctuation", no_punctuation, "keep Arabic punctuation");
    app->add_flag("--keep-tatweel", keep_tatweel, "keep tatweel");
    app->add_flag("--no-nfkc", no_nfkc, "skip NFKC");
    app->add_flag("--raw", raw, "disable every rule family except the diacritics choice");
  }

  // File, then ARATOK_<KEY> environment variables, then flags.
  NormalizationConfig resolve(const EnvLookup& env) const {
    NormalizationConfig c;
    std::string path = config_path;
    if (path.empty()) {
      if (auto p = env("ARATOK_CONFIG")) path = *p;
    }
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open config file " + path);
      c = read_config(in, c);
    }
    for (std::string_view key : kConfigKeys) {
      std::string name = "ARATOK_";
      for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (auto v = env(name)) {
        try {
          set_config_value(c, key, *v);
        } catch (const ConfigError& e) {
          throw ConfigError(name + ": " + e.what());
        }
      }
    }
    if (raw) c = NormalizationConfig::unnormalized(c.diacritics);
    if (!alif.empty()) c.alif_mode = parse_alif_mode(alif);
    if (drop) c.diacritics = DiacriticsMode::Drop;
    if (keep) c.diacritics = DiacriticsMode::Keep;
    if (no_numerals) c.map_numerals = false;
    if (no_punctuation) c.map_punctuation = false;
    if (keep_tatweel) c.remove_tatweel = false;
    if (no_nfkc) c.apply_nfkc = false;
    return c;
  }
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

inline TokenizerModel load_model_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return load_model(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Statistics over the given files in order, or stdin when none are given.
inline CorpusStats ingest_inputs(const std::vector<std::string>& paths, std::istream& in,
                                 const Normalizer& normalizer, std::optional<std::size_t> max_lines) {
  if (paths.empty()) return ingest(in, normalizer, {max_lines});
  CorpusStats stats;
  std::size_t n = 0;
  for (const auto& path : paths) {
    auto file = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (!(max_lines && n >= *max_lines) && std::getline(file, line)) {
      ingest_line(stats, line, normalizer);
      ++lineno;
      ++n;
    }
    if (file.bad()) {
      throw DataError(path + ": read error at line " + std::to_string(lineno + 1));
    }
  }
  return stats;
}

template <typename Fn>
void for_each_input_line(const std::string& path, std::istream& in, Fn&& fn) {
  std::ifstream file;
  std::istream* src = &in;
  if (!path.empty() && path != "-") {
    file = open_input(path);
    src = &file;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*src, line)) fn(line, ++lineno);
  if (src->bad()) throw DataError("read error at line " + std::to_string(lineno + 1));
}

inline std::vector<TokenId> parse_ids(std::string_view line, std::size_t lineno) {
  std::vector<TokenId> ids;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    TokenId v = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw DataError("line " + std::to_string(lineno) + ": bad token id '" +
                      std::string(line.substr(pos, end - pos)) + "'");
    }
    ids.push_back(v);
    pos = end;
  }
  return ids;
}

inline std::vector<int> parse_layers(const std::string& spec) {
  std::vector<int> layers;
  if (spec.empty()) return layers;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const auto t = aratok::detail::trim(item);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || v < 0) {
      throw ConfigError("bad layer index '" + item + "'");
    }
    layers.push_back(v);
  }
  return layers;
}

inline void write_output(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path + " for writing");
  file << text;
  if (!file) throw DataError("failed writing " + path);
}

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                    std::ostream& err, const EnvLookup& env = process_env) {
  CLI::App app{"Arabic subword tokenization toolkit", "aratok"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  int threads = 1;
  std::uint64_t seed = 42;
  std::optional<std::size_t> max_lines;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--max-lines", max_lines, "stop after this many input lines");
  };

  // normalize
  detail::NormFlags norm_flags;
  std::string normalize_input;
  auto* normalize_cmd = app.add_subcommand("normalize", "normalize UTF-8 text line by line");
  normalize_cmd->add_option("input", normalize_input, "input file (default stdin)");
  norm_flags.attach(normalize_cmd);

  // ingest
  std::vector<std::string> ingest_corpus;
  bool ingest_counts = false;
  auto* ingest_cmd = app.add_subcommand("ingest", "print corpus statistics as JSON");
  ingest_cmd->add_option("--corpus", ingest_corpus, "corpus files (default stdin)");
  ingest_cmd->add_flag("--counts", ingest_counts, "print word<TAB>count lines instead");
  norm_flags.attach(ingest_cmd);
  add_common(ingest_cmd);

  // train
  std::string algo;
  std::size_t vocab_size = 0;
  std::vector<std::string> train_corpus;
  std::string train_out;
  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "train a tokenizer model");
  train_cmd->add_option("--algo", algo, "unigram, bpe or wordpiece")->required();
  train_cmd->add_option("--vocab-size", vocab_size, "target vocabulary size")->required();
  train_cmd->add_option("--corpus", train_corpus, "corpus files (default stdin)");
  train_cmd->add_option("-o,--output", train_out, "model file (default stdout)");
  train_cmd->add_option("--seed-size", train_opts.unigram.seed_size, "unigram seed pieces");
  train_cmd->add_option("--max-piece-length", train_opts.unigram.max_piece_length);
  train_cmd->add_option("--em-iters", train_opts.unigram.em_iters);
  train_cmd->add_option("--shrink-factor", train_opts.unigram.shrink_factor);
  train_cmd->add_option("--character-coverage", train_opts.unigram.character_coverage);
  train_cmd->add_option("--min-pair-freq", train_opts.merge.min_pair_freq);
  train_cmd->add_option("--seed", seed, "random seed (training itself is deterministic)");
  norm_flags.attach(train_cmd);
  add_common(train_cmd);

  // encode / decode
  std::string codec_model, codec_input;
  bool show_pieces = false, no_normalize = false;
  auto* encode_cmd = app.add_subcommand("encode", "encode lines to token ids");
  encode_cmd->add_option("model", codec_model, "model file")->required();
  encode_cmd->add_option("input", codec_input, "input file (default stdin)");
  encode_cmd->add_flag("--show-pieces", show_pieces, "print token strings instead of ids");
  encode_cmd->add_flag("--no-normalize", no_normalize, "input is already normalized");
  auto* decode_cmd = app.add_subcommand("decode", "decode lines of token ids");
  decode_cmd->add_option("model", codec_model, "model file")->required();
  decode_cmd->add_option("input", codec_input, "input file (default stdin)");

  // evaluate
  std::vector<std::string> eval_corpus;
  bool eval_json = false, eval_table = false;
  std::string eval_name;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "fertility, compression and OOV rate");
  evaluate_cmd->add_option("model", codec_model, "model file")->required();
  evaluate_cmd->add_option("--corpus", eval_corpus, "evaluation files (default stdin)");
  auto* json_flag = evaluate_cmd->add_flag("--json", eval_json, "JSON output (default)");
  evaluate_cmd->add_flag("--table", eval_table, "table row output")->excludes(json_flag);
  evaluate_cmd->add_option("--name", eval_name, "row label for --table");
  add_common(evaluate_cmd);

  // prune
  double coverage = 0.0;
  std::vector<std::string> prune_corpus;
  std::string prune_out;
  auto* prune_cmd = app.add_subcommand("prune", "drop tokens outside a coverage target");
  prune_cmd->add_option("model", codec_model, "model file")->required();
  prune_cmd->add_option("--coverage", coverage, "cumulative coverage in (0, 1]")->required();
  prune_cmd->add_option("--corpus", prune_corpus, "reference files (default stdin)");
  prune_cmd->add_option("-o,--output", prune_out, "model file (default stdout)");
  add_common(prune_cmd);

  // extend
  std::string ext_arabic, ext_vocab, ext_emb, ext_submap, ext_out, ext_filter;
  std::string ext_layers = "24,25,26,27";
  auto* extend_cmd = app.add_subcommand("extend", "build a vocabulary extension plan");
  extend_cmd->add_option("--arabic", ext_arabic, "Arabic tokenizer model")->required();
  extend_cmd->add_option("--base-vocab", ext_vocab, "base vocabulary, one token per line")
      ->required();
  extend_cmd->add_option("--base-emb", ext_emb, "base embeddings (ARTE)")->required();
  extend_cmd->add_option("--submap", ext_submap, "token<TAB>ids file")->required();
  extend_cmd->add_option("--out", ext_out, "output directory")->required();
  extend_cmd->add_option("--layers", ext_layers, "comma-separated layers to unfreeze");
  extend_cmd->add_option("--filter", ext_filter, "codepoint filter file replacing the defaults");

  // repro
  std::vector<std::string> repro_corpus;
  std::size_t repro_vocab = 8000;
  double heldout = 0.1;
  bool repro_json = false;
  auto* repro_cmd = app.add_subcommand("repro", "run the algorithm x normalization grid");
  repro_cmd->add_option("--corpus", repro_corpus, "corpus files")
      ->default_val(std::vector<std::string>{"data/corpus/quran_uthmani.txt",
                                             "data/corpus/quran_imlaei.txt"});
  repro_cmd->add_option("--vocab-size", repro_vocab, "vocabulary size for every run");
  repro_cmd->add_option("--heldout", heldout, "held-out fraction of lines");
  repro_cmd->add_option("--seed", seed, "split seed");
  repro_cmd->add_flag("--json", repro_json, "JSON output");
  add_common(repro_cmd);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    train_opts.unigram.threads = static_cast<unsigned>(threads);

    if (*normalize_cmd) {
      const Normalizer n(norm_flags.resolve(env));
      detail::for_each_input_line(normalize_input, in, [&](const std::string& line, std::size_t) {
        out << n.normalize(line) << '\n';
      });
    } else if (*ingest_cmd) {
      const Normalizer n(norm_flags.resolve(env));
      const auto stats = detail::ingest_inputs(ingest_corpus, in, n, max_lines);
      if (ingest_counts) {
        for (const auto& [w, c] : stats.word_counts) out << w << '\t' << c << '\n';
      } else {
        nlohmann::ordered_json j;
        j["total_words"] = stats.total_words;
        j["total_chars"] = stats.total_chars;
        j["distinct_words"] = stats.word_counts.size();
        out << j.dump() << '\n';
      }
    } else if (*train_cmd) {
      const auto config = norm_flags.resolve(env);
      const auto algorithm = parse_algorithm(algo);
      const Normalizer n(config);
      const auto stats = detail::ingest_inputs(train_corpus, in, n, max_lines);
      const auto model = train(algorithm, stats, vocab_size, train_opts, config);
      detail::write_output(train_out, out, model_to_string(model));
    } else if (*encode_cmd) {
      const Codec codec(detail::load_model_file(codec_model));
      const EncodeOptions opts{!no_normalize};
      detail::for_each_input_line(codec_input, in, [&](const std::string& line, std::size_t) {
        const auto pieces = codec.encode_pieces(line, opts);
        for (std::size_t i = 0; i < pieces.size(); ++i) {
          if (i) out << ' ';
          if (show_pieces) {
            out << pieces[i].surface;
          } else {
            out << pieces[i].id;
          }
        }
        out << '\n';
      });
    } else if (*decode_cmd) {
      const Codec codec(detail::load_model_file(codec_model));
      detail::for_each_input_line(codec_input, in, [&](const std::string& line, std::size_t no) {
        try {
          out << codec.decode(detail::parse_ids(line, no)) << '\n';
        } catch (const DataError& e) {
          const std::string msg = e.what();
          throw DataError(msg.starts_with("line ") ? msg
                                                   : "line " + std::to_string(no) + ": " + msg);
        }
      });
    } else if (*evaluate_cmd) {
      const Codec codec(detail::load_model_file(codec_model));
      const auto stats = detail::ingest_inputs(eval_corpus, in, codec.normalizer(), max_lines);
      const auto report = evaluate(codec, stats);
      if (eval_table) {
        out << table_header() << '\n'
            << table_row(eval_name.empty() ? std::string_view(codec_model) : eval_name, report)
            << '\n';
      } else {
        out << to_json(report).dump() << '\n';
      }
    } else if (*prune_cmd) {
      const Codec codec(detail::load_model_file(codec_model));
      const auto stats = detail::ingest_inputs(prune_corpus, in, codec.normalizer(), max_lines);
      const auto pruned = prune_vocab(codec.model(), token_frequencies(codec, stats), coverage);
      detail::write_output(prune_out, out, model_to_string(pruned));
    } else if (*extend_cmd) {
      const auto model = detail::load_model_file(ext_arabic);
      auto vin = detail::open_input(ext_vocab);
      const auto base_vocab = read_base_vocab(vin);
      const auto base = read_arte_file(ext_emb);
      auto sin = detail::open_input(ext_submap);
      const auto submap = read_submap(sin);
      TokenFilter filter = TokenFilter::defaults();
      if (!ext_filter.empty()) {
        std::ifstream fin(ext_filter);
        if (!fin) throw ConfigError("cannot open filter file " + ext_filter);
        filter = TokenFilter::read(fin);
      }
      const auto plan = build_extension_plan(model, base_vocab, base, submap,
                                             detail::parse_layers(ext_layers), filter);
      save_plan(ext_out, plan);
      err << "extension plan: " << plan.new_tokens.size() << " new tokens, freeze threshold "
          << plan.freeze_threshold << '\n';
    } else if (*repro_cmd) {
      std::vector<std::string> train_lines, eval_lines;
      for (const auto& path : repro_corpus) {
        auto lines = read_lines_file(path);
        if (max_lines && lines.size() > *max_lines) lines.resize(*max_lines);
        const auto split = split_indices(lines.size(), heldout, seed);
        for (auto i : split.train) train_lines.push_back(lines[i]);
        for (auto i : split.heldout) eval_lines.push_back(lines[i]);
      }
      const auto cells = run_grid(train_lines, eval_lines, repro_vocab, train_opts);
      if (repro_json) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& c : cells) {
          auto j = to_json(c.metrics);
          j["name"] = c.name;
          j["vocab_size"] = c.vocab_size;
          arr.push_back(std::move(j));
        }
        out << arr.dump(1) << '\n';
      } else {
        out << table_header() << '\n';
        for (const auto& c : cells) out << table_row(c.name, c.metrics) << '\n';
      }
    }
    out.flush();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "aratok: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "aratok: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "aratok: " << e.what() << '\n';
    return kExitData;
  }
}

inline int dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                    std::ostream& err, const EnvLookup& env = process_env) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, in, out, err, env);
}

}  // namespace aratok::cli

#endif  // ARATOK_CLI_HPP_
