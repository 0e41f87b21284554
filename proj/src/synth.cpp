// SPDX-License-Identifier: Apache-2.0
#include "stylodet/synth.hpp"

#include <array>
#include <cctype>

#include "stylodet/rng.hpp"

namespace stylodet {

namespace {

constexpr std::array<const char*, 16> kWords = {"value", "total", "count", "index", "result", "item",
                                                "buffer", "limit", "score", "entry", "weight", "offset",
                                                "sample", "record", "target", "window"};

class Writer {
 public:
  Writer(SynthStyle style, Rng& rng) : style_(style), rng_(rng) {}

  std::string name(const char* a, const char* b) const {
    std::string out = a;
    if (style_ == SynthStyle::classic) {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(b[0])));
      out += b + 1;
    } else {
      out += '_';
      out += b;
    }
    return out;
  }

  std::string fresh() {
    const char* a = kWords[rng_.below(kWords.size())];
    const char* b = kWords[rng_.below(kWords.size())];
    return name(a, b);
  }

  std::string method_name(const char* verb) {
    const char* noun = kWords[rng_.below(kWords.size())];
    return name(verb, noun) + std::to_string(rng_.below(100));
  }

  // Emits a loop over [0, bound) whose body is produced by `body(var, indent)`.
  template <typename Body>
  void index_loop(std::string& out, const std::string& indent, const std::string& bound, Body body) {
    if (style_ == SynthStyle::classic) {
      const std::string v = loop_var_classic();
      out += indent + "for (int " + v + " = 0; " + v + " < " + bound + "; " + v + "++) {\n";
      body(v, indent + "    ");
      out += indent + "}\n";
    } else {
      const std::string v = loop_var_rewritten();
      out += indent + "int " + v + " = 0;\n";
      out += indent + "while (" + v + " < " + bound + ") {\n";
      body(v, indent + "    ");
      out += indent + "    " + v + " += 1;\n";
      out += indent + "}\n";
    }
  }

  SynthStyle style() const { return style_; }
  Rng& rng() { return rng_; }

 private:
  std::string loop_var_classic() { return std::string(1, "ijk"[depth_++ % 3]); }
  std::string loop_var_rewritten() { return std::string("pos_") + kWords[rng_.below(kWords.size())]; }

  SynthStyle style_;
  Rng& rng_;
  std::size_t depth_ = 0;
};

void method_sum(Writer& w, std::string& out) {
  const std::string arr = w.fresh() + "s";
  const std::string acc = w.fresh();
  out += "    public static int " + w.method_name("sum") + "(int[] " + arr + ") {\n";
  out += "        int " + acc + " = 0;\n";
  if (w.style() == SynthStyle::rewritten && w.rng().below(2) == 0) {
    const std::string el = w.fresh();
    out += "        for (int " + el + " : " + arr + ") {\n";
    out += "            " + acc + " += " + el + ";\n";
    out += "        }\n";
  } else {
    w.index_loop(out, "        ", arr + ".length", [&](const std::string& v, const std::string& ind) {
      out += ind + acc + " += " + arr + "[" + v + "];\n";
    });
  }
  out += "        return " + acc + ";\n";
  out += "    }\n\n";
}

void method_count(Writer& w, std::string& out) {
  const std::string arr = w.fresh();
  const std::string limit = w.fresh();
  const std::string hits = w.fresh();
  out += "    public int " + w.method_name("count") + "(int[] " + arr + ", int " + limit + ") {\n";
  out += "        int " + hits + " = 0;\n";
  w.index_loop(out, "        ", arr + ".length", [&](const std::string& v, const std::string& ind) {
    out += ind + "if (" + arr + "[" + v + "] > " + limit + ") {\n";
    out += ind + "    " + hits + "++;\n";
    out += ind + "}\n";
  });
  out += "        return " + hits + ";\n";
  out += "    }\n\n";
}

void method_max(Writer& w, std::string& out) {
  const std::string arr = w.fresh();
  const std::string best = w.fresh();
  out += "    public static double " + w.method_name("find") + "(double[] " + arr + ") {\n";
  out += "        double " + best + " = Double.NEGATIVE_INFINITY;\n";
  w.index_loop(out, "        ", arr + ".length", [&](const std::string& v, const std::string& ind) {
    out += ind + "if (" + arr + "[" + v + "] > " + best + ") {\n";
    out += ind + "    " + best + " = " + arr + "[" + v + "];\n";
    out += ind + "}\n";
  });
  out += "        return " + best + ";\n";
  out += "    }\n\n";
}

void method_reverse(Writer& w, std::string& out) {
  const std::string text = w.fresh();
  const std::string sb = w.fresh();
  out += "    public String " + w.method_name("reverse") + "(String " + text + ") {\n";
  out += "        StringBuilder " + sb + " = new StringBuilder();\n";
  w.index_loop(out, "        ", text + ".length()", [&](const std::string& v, const std::string& ind) {
    out += ind + sb + ".append(" + text + ".charAt(" + text + ".length() - 1 - " + v + "));\n";
  });
  out += "        return " + sb + ".toString();\n";
  out += "    }\n\n";
}

void method_factorial(Writer& w, std::string& out) {
  const std::string n = w.fresh();
  const std::string acc = w.fresh();
  out += "    public static long " + w.method_name("compute") + "(int " + n + ") {\n";
  out += "        long " + acc + " = 1;\n";
  w.index_loop(out, "        ", n, [&](const std::string& v, const std::string& ind) {
    out += ind + acc + " *= (" + v + " + 1);\n";
  });
  out += "        return " + acc + ";\n";
  out += "    }\n\n";
}

void method_grid(Writer& w, std::string& out) {
  const std::string grid = w.fresh();
  const std::string acc = w.fresh();
  out += "    public int " + w.method_name("scan") + "(int[][] " + grid + ") {\n";
  out += "        int " + acc + " = 0;\n";
  w.index_loop(out, "        ", grid + ".length", [&](const std::string& r, const std::string& ind) {
    w.index_loop(out, ind, grid + "[" + r + "].length", [&](const std::string& c, const std::string& ind2) {
      out += ind2 + acc + " += " + grid + "[" + r + "][" + c + "];\n";
    });
  });
  out += "        return " + acc + ";\n";
  out += "    }\n\n";
}

void method_accessor(Writer& w, std::string& out, const std::string& field) {
  const std::string arg = w.fresh();
  out += "    public void " + w.method_name("set") + "(int " + arg + ") {\n";
  out += "        this." + field + " = " + arg + ";\n";
  out += "    }\n\n";
}

}  // namespace

std::string generate_java_class(SynthStyle style, const std::string& class_name, std::uint64_t seed,
                                std::size_t methods) {
  Rng rng(seed);
  Writer w(style, rng);
  std::string out;
  out += "import java.util.*;\n\n";
  out += "public class " + class_name + " {\n";
  const std::string field = w.fresh();
  out += "    private int " + field + ";\n\n";
  for (std::size_t m = 0; m < methods; ++m) {
    switch (rng.below(7)) {
      case 0: method_sum(w, out); break;
      case 1: method_count(w, out); break;
      case 2: method_max(w, out); break;
      case 3: method_reverse(w, out); break;
      case 4: method_factorial(w, out); break;
      case 5: method_grid(w, out); break;
      default: method_accessor(w, out, field); break;
    }
  }
  out += "}\n";
  return out;
}

std::vector<SynthFile> generate_style_corpus(const SynthOptions& options) {
  std::vector<SynthFile> files;
  Rng rng(options.seed);
  const std::size_t span = options.max_methods >= options.min_methods ? options.max_methods - options.min_methods + 1 : 1;
  for (std::size_t k = 0; k < options.files; ++k) {
    const SynthStyle style = k % 2 == 0 ? SynthStyle::classic : SynthStyle::rewritten;
    const std::size_t methods = options.min_methods + static_cast<std::size_t>(rng.below(span));
    const std::uint64_t file_seed = rng.next();
    const std::string name = "Task" + std::to_string(k / 2);
    SynthFile f;
    f.style = style;
    if (style == SynthStyle::classic) {
      const std::size_t author = (k / 2) % std::max<std::size_t>(1, options.human_authors);
      f.path = "human/author" + std::to_string(author) + "/" + name + ".java";
    } else {
      f.path = "llm/" + options.llm_model + "/" + name + ".java";
    }
    f.text = generate_java_class(style, name, file_seed, methods);
    files.push_back(std::move(f));
  }
  return files;
}

void write_style_corpus(const std::filesystem::path& root, const SynthOptions& options) {
  for (const auto& f : generate_style_corpus(options)) write_text_file_atomic(root / f.path, f.text);
}

}  // namespace stylodet
